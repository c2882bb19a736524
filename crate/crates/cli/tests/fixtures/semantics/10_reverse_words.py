def reverse_words(sentence):
    words = sentence.split()
    reversed_words = []
    index = len(words) - 1
    while index >= 0:
        reversed_words.append(words[index])
        index -= 1
    return " ".join(reversed_words)

# --- tests ---
assert reverse_words("the quick brown fox") == "fox brown quick the"
assert reverse_words("") == ""
assert reverse_words("one") == "one"
