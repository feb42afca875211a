#include <stdio.h>

int main()
{
    int x, c = 1;
    scanf("%d", &x);
    while ((x/2)!=0)
    {
        if ((x%2)!=0)
            c++;
        x = x/2;
    }
    printf("%d\n", c);
    return 0;
}
