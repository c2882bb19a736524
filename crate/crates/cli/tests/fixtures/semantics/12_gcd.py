def gcd(first_num, second_num):
    while second_num != 0:
        first_num, second_num = second_num, first_num % second_num
    return abs(first_num)

# --- tests ---
assert gcd(12, 18) == 6
assert gcd(7, 0) == 7
assert gcd(-4, 6) == 2
