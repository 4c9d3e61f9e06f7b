"""Dataset loading, activity filtering and the temporal split."""
