"""JSON input and output for matrices, oracles and reports."""
