"""Exact algebraic primitives: scalars, polynomials, the exterior algebra and the Koszul dga."""
