def is_palindrome(text):
    clean_text = [char.lower() for char in text if char.isalnum()]
    for pos in range(len(clean_text) // 2):
        if clean_text[pos] != clean_text[len(clean_text) - 1 - pos]:
            return False
    return True

# --- tests ---
assert is_palindrome("A man, a plan, a canal: Panama")
assert not is_palindrome("hello")
assert is_palindrome("")
