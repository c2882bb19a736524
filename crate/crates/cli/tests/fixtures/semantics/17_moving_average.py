def moving_average(values, window_size):
    averages = []
    if window_size <= 0 or window_size > len(values):
        return averages
    for start in range(len(values) - window_size + 1):
        window_sum = 0
        for offset in range(window_size):
            window_sum += values[start + offset]
        averages.append(window_sum / window_size)
    return averages

# --- tests ---
assert moving_average([1, 2, 3, 4], 2) == [1.5, 2.5, 3.5]
assert moving_average([1, 2], 3) == []
assert moving_average([4], 1) == [4.0]
