def fizz_buzz(limit):
    result_list = []
    for number in range(1, limit + 1):
        if number % 15 == 0:
            result_list.append("FizzBuzz")
        elif number % 3 == 0:
            result_list.append("Fizz")
        elif number % 5 == 0:
            result_list.append("Buzz")
        else:
            result_list.append(str(number))
    return result_list

# --- tests ---
assert fizz_buzz(5) == ["1", "2", "Fizz", "4", "Buzz"]
assert fizz_buzz(15)[-1] == "FizzBuzz"
assert fizz_buzz(0) == []
