"""Really just here as a marker for an implied package."""
