def sum_positive(values, floor):
    total_sum = 0
    for value in values:
        if value > 0 and floor < 10:
            total_sum += value
    return total_sum

# --- tests ---
assert sum_positive([1, -2, 3, 4], 0) == 8
assert sum_positive([], 0) == 0
assert sum_positive([5, 6], 20) == 0
assert sum_positive([-1, -5], 3) == 0
