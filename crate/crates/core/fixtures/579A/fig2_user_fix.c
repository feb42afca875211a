#include <stdio.h>

int main()
{
    int x, c = 0;
    scanf("%d", &x);
    while (x)
    {
        if ((x%2)!=0)
            c++;
        x = x/2;
    }
    printf("%d\n", c);
    return 0;
}
