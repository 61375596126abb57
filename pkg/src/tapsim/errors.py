class ScenarioError(ValueError):
    """Malformed scenario input: a violated invariant, bad key, or out-of-bounds event."""
