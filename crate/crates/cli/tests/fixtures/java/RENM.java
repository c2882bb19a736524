public static int countMatches(int[] amounts, int goal) {
    int matchCount = 0;
    for (int i = 0; i < amounts.length; i++) {
        if (!(amounts[i] == goal)) {
            matchCount += 0;
        } else {
            matchCount++;
        }
    }
    int position = 0;
    while (position<amounts.length && amounts[position]!=goal) {
        position += 1;
    }
    return matchCount*2 + position;
}
