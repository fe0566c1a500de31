M=(1<<64)-1
class SM:
    def __init__(s,seed): s.x=seed&M
    def next(s):
        s.x=(s.x+0x9E3779B97F4A7C15)&M; z=s.x
        z=((z^(z>>30))*0xBF58476D1CE4E5B9)&M
        z=((z^(z>>27))*0x94D049BB133111EB)&M
        return z^(z>>31)
def positions(n,k,seed):
    r=SM(seed); ch=set()
    for j in range(n-k,n):
        t=r.next()%(j+1)
        ch.add(j if t in ch else t)
    return sorted(ch)
print("pos", positions(100,10,1))
r=SM(7); print("u32", [hex(r.next()>>32) for _ in range(16)])
r=SM(0); print("sm0", [hex(r.next()) for _ in range(3)])
import math
def minos(n,p,eps,rho,base=2):
    lg=lambda x: math.log(x)/math.log(base)
    s=1
    while True:
        if p*s>=n/2: raise Exception("inf")
        q=p*s-1
        rhs=(1+eps)/eps**2*(2*rho*lg(n)+lg(2*math.pi*p*p*q)+1/(3*q)/math.log(base))
        ns=math.ceil(rhs)
        if ns==s: return s
        s=ns
print("minos 2^20 p4", minos(2**20,4,.5,1), "2^18 p8", minos(2**18,8,.5,1), "e", minos(2**20,4,.5,1,math.e))
