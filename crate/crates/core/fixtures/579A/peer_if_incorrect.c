#include <stdio.h>

int main()
{
    int n, ans = 1;
    scanf("%d", &n);
    if ((n/2)!=0)
    {
        if ((n%2)!=0)
            ans++;
        n = n/2;
    }
    printf("%d\n", ans);
    return 0;
}
