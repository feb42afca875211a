#include <stdio.h>

int main()
{
    int t;
    scanf("%d", &t);
    while (t--) {
        long long n;
        scanf("%lld", &n);
        while (!(n & 1))
            n >>= 1;
        if (n == 1)
            printf("NO\n");
        else
            printf("YES\n");
    }
    return 0;
}
