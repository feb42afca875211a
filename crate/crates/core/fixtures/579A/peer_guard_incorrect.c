#include <stdio.h>

int main()
{
    int n, ones = 0;
    scanf("%d", &n);
    while (n>0)
    {
        if (n%2==0)
            ones++;
        n = n/2;
    }
    printf("%d\n", ones);
    return 0;
}
