void count(int x)
{
    int c = 1;
    if ((x/2)!=0)
    {
        if ((x%2)!=0)
            c++;
        x = x/2;
    }
    printf("%d\n", c);
}
