def first_negative(values):
    for value in values:
        if value < 0:
            return value
    return None

# --- tests ---
assert first_negative([3, -1, -5]) == -1
assert first_negative([1, 2]) is None
assert first_negative([]) is None
