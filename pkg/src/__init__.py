"""hlrank: rank and degrees of freedom of hierarchical log-linear models."""
