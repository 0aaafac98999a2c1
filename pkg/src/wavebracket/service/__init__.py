"""FastAPI service wrapping the core package."""
