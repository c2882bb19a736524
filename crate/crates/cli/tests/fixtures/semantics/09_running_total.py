def running_total(values):
    running = []
    current_sum = 0
    for value in values:
        current_sum = current_sum + value
        running.append(current_sum)
    return running

# --- tests ---
assert running_total([1, 2, 3]) == [1, 3, 6]
assert running_total([]) == []
assert running_total([5, -5, 2]) == [5, 0, 2]
