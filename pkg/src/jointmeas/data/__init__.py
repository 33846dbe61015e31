"""Bundled measured outcome tables and the tomographic state fixture."""
