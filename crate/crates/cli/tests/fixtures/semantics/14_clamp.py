def clamp(value, min_value, max_value):
    if value < min_value:
        return min_value
    if not value <= max_value:
        return max_value
    else:
        return value

# --- tests ---
assert clamp(5, 0, 10) == 5
assert clamp(-3, 0, 10) == 0
assert clamp(42, 0, 10) == 10
