public static int countMatches(int[] values, int target) {
    int matchCount = 0;
    for (int i = 0; i < values.length; i++) {
        if (!(values[i] == target)) {
            matchCount += 0;
        } else {
            matchCount++;
        }
    }
    int index = 0;
    while (index<values.length && values[index]!=target) {
        index += 1;
    }
    return matchCount*2 + index;
}
