"""Lower bounds for the Steiner Forest problem from LP relaxations."""
