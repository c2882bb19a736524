def prefix_sums(numbers):
    sums = [0] * (len(numbers) + 1)
    for i in range(len(numbers)):
        sums[i + 1] = sums[i] + numbers[i]
    return sums

# --- tests ---
assert prefix_sums([1, 2, 3]) == [0, 1, 3, 6]
assert prefix_sums([]) == [0]
