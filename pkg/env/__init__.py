"""The recommender environment: ranking, rendering, action grammar and transitions."""
