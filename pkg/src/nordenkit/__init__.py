"""Frame-based tensor calculus for almost complex manifolds with Norden metric."""
