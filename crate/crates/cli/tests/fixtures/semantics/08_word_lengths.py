def word_lengths(words):
    length_map = {}
    for word in words:
        if word not in length_map:
            length_map[word] = len(word)
    return length_map

# --- tests ---
assert word_lengths(["a", "abc", "a"]) == {"a": 1, "abc": 3}
assert word_lengths([]) == {}
