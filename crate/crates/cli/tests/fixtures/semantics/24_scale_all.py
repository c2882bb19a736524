def scale_all(values, factor):
    scaled = []
    for value in values:
        scaled.append(value * factor)
    return scaled

# --- tests ---
assert scale_all([1, 2, 3], 2) == [2, 4, 6]
assert scale_all((), 5) == []
assert scale_all("ab", 2) == ["aa", "bb"]
