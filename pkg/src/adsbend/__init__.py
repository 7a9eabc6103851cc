"""Bent ideal polyhedra in anti-de Sitter space and discrete earthquakes."""

__version__ = "0.1.0"
