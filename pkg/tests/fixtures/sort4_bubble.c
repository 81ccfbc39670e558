// Bubble sort, 4 elements of 4 bits each.  Same algorithm as the 8x8
// variant, scaled down so the whole input space (2^16) is enumerable.
#define N 4

extern "C" void Sort(unsigned _BitInt(4) input[N], unsigned _BitInt(4) output[N]) {
    unsigned _BitInt(4) temp[N];

    for (unsigned int i = 0; i < N; i++) {
        temp[i] = input[i];
    }

    for (unsigned int i = N - 1; i > 0; i--) {
        unsigned _BitInt(4) high = temp[0];
        unsigned _BitInt(4) low = 0;

        for (unsigned int j = 1; j < N; j++) {
            if (j <= i) {
                if (temp[j] > high) {
                    low = high;
                    high = temp[j];
                } else {
                    low = temp[j];
                }
            } else {
                low = temp[j - 1];
            }

            temp[j - 1] = low;
        }

        temp[i] = high;
    }

    for (unsigned int i = 0; i < N; i++) {
        output[i] = temp[i];
    }
}
