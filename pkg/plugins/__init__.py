"""Plugins directory for orbitqaoa extensions."""
