"""HTTP service exposing the gait catalog and simulation runners."""

from .app import app, create_app

__all__ = ["app", "create_app"]
