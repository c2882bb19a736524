def classify_weather(temp, humidity):
    if temp > 30 and humidity > 70:
        label = "muggy"
    elif temp > 30:
        label = "hot"
    elif temp < 5 or humidity < 10:
        label = "harsh"
    else:
        label = "mild"
    return label

# --- tests ---
assert classify_weather(35, 80) == "muggy"
assert classify_weather(35, 20) == "hot"
assert classify_weather(0, 50) == "harsh"
assert classify_weather(20, 5) == "harsh"
assert classify_weather(20, 50) == "mild"
