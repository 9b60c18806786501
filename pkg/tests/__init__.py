"""nclebesgue test suite."""
