"""zernq test suite."""
