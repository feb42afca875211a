#include <stdio.h>

int has_odd_divisor(unsigned long long n)
{
    for (unsigned long long i = 3; i < n; i += 2) {
        if (n % i == 0)
            return 1;
    }
    return n % 2 == 1;
}

int main()
{
    int t;
    scanf("%d", &t);
    while (t--) {
        unsigned long long n;
        scanf("%llu", &n);
        printf("%s\n", has_odd_divisor(n) ? "YES" : "NO");
    }
    return 0;
}
