"""Parallel Weingarten flows of isoparametric hypersurfaces."""
