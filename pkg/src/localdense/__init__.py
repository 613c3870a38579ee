"""Top-k locally densest (edge) and triangle-densest subgraph discovery."""
