// 4-element scaled copy of dot64_good.c, small enough for SAT-based
// equivalence runs while keeping the 16-bit element type.
#include <cstdint>

extern "C" int64_t Dot(const int16_t (&arg_0)[4], const int16_t (&arg_1)[4]) {
    int64_t sum = 0;
    for (int i = 0; i < 4; ++i) {
        int32_t product = (int32_t)arg_0[i] * (int32_t)arg_1[i];
        sum += (int64_t)product;
    }
    return sum;
}
