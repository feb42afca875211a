void count(int x)
{
    int u = 0;
    while (x>0)
    {
        if (x%2==0)
            u++;
        x = x/2;
    }
    printf("%d\n", u);
}
