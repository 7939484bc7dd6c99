"""hydrofrac - Peridynamic solid / FEM flow simulator for hydraulic fracture in porous media."""

__version__ = "0.1.0"
