"""Results dashboard pages."""
