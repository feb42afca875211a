#include <stdio.h>

int main()
{
    int x, u = 0;
    scanf("%d", &x);
    while (x>0)
    {
        if (x%2)
            u++;
        x = x/2;
    }
    printf("%d\n", u);
    return 0;
}
