#include <stdio.h>

int main()
{
    int x, u = 0;
    scanf("%d", &x);
    while (x!=0)
    {
        u += x%2;
        x /= 2;
    }
    printf("%d\n", u);
    return 0;
}
