def compress(text):
    if not text:
        return ""
    parts = []
    current_char = text[0]
    run_length = 1
    for char in text[1:]:
        if char == current_char:
            run_length += 1
        else:
            parts.append(f"{current_char}{run_length}")
            current_char = char
            run_length = 1
    parts.append(f"{current_char}{run_length}")
    return "".join(parts)

# --- tests ---
assert compress("aaabcc") == "a3b1c2"
assert compress("") == ""
assert compress("z") == "z1"
