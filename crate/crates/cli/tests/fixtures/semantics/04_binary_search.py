def binary_search(items, target):
    low = 0
    high = len(items) - 1
    while low <= high:
        mid = (low + high) // 2
        if items[mid] == target:
            return mid
        elif items[mid] < target:
            low = mid + 1
        else:
            high = mid - 1
    return -1

# --- tests ---
data = [1, 3, 5, 7, 9, 11]
for position, item in enumerate(data):
    assert binary_search(data, item) == position
assert binary_search(data, 4) == -1
assert binary_search([], 1) == -1
