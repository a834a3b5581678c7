"""Dormand-Prince 8(5,3) tableau (Hairer, Norsett & Wanner).

Coefficients for the 12-stage order-8 pair with embedded order-5
and order-3 error estimators, plus the three extra stages and D
matrix of the order-7 dense-output interpolant.
"""

import numpy as np

N_STAGES = 12
N_STAGES_EXTENDED = 16

C = np.array([
    np.float64(0.0),
    np.float64(0.05260015195876773),
    np.float64(0.0789002279381516),
    np.float64(0.1183503419072274),
    np.float64(0.2816496580927726),
    np.float64(0.3333333333333333),
    np.float64(0.25),
    np.float64(0.3076923076923077),
    np.float64(0.6512820512820513),
    np.float64(0.6),
    np.float64(0.8571428571428571),
    np.float64(1.0),
    np.float64(1.0),
    np.float64(0.1),
    np.float64(0.2),
    np.float64(0.7777777777777778),
])

A = np.array([
    [np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.05260015195876773), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.0197250569845379), np.float64(0.0591751709536137), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.02958758547680685), np.float64(0.0), np.float64(0.08876275643042054), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.2413651341592667), np.float64(0.0), np.float64(-0.8845494793282861), np.float64(0.924834003261792), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.037037037037037035), np.float64(0.0), np.float64(0.0), np.float64(0.17082860872947386), np.float64(0.12546768756682242), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.037109375), np.float64(0.0), np.float64(0.0), np.float64(0.17025221101954405), np.float64(0.06021653898045596), np.float64(-0.017578125), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.03709200011850479), np.float64(0.0), np.float64(0.0), np.float64(0.17038392571223998), np.float64(0.10726203044637328), np.float64(-0.015319437748624402), np.float64(0.008273789163814023), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.6241109587160757), np.float64(0.0), np.float64(0.0), np.float64(-3.3608926294469414), np.float64(-0.868219346841726), np.float64(27.59209969944671), np.float64(20.154067550477894), np.float64(-43.48988418106996), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.47766253643826434), np.float64(0.0), np.float64(0.0), np.float64(-2.4881146199716677), np.float64(-0.590290826836843), np.float64(21.230051448181193), np.float64(15.279233632882423), np.float64(-33.28821096898486), np.float64(-0.020331201708508627), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(-0.9371424300859873), np.float64(0.0), np.float64(0.0), np.float64(5.186372428844064), np.float64(1.0914373489967295), np.float64(-8.149787010746927), np.float64(-18.52006565999696), np.float64(22.739487099350505), np.float64(2.4936055526796523), np.float64(-3.0467644718982196), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(2.273310147516538), np.float64(0.0), np.float64(0.0), np.float64(-10.53449546673725), np.float64(-2.0008720582248625), np.float64(-17.9589318631188), np.float64(27.94888452941996), np.float64(-2.8589982771350235), np.float64(-8.87285693353063), np.float64(12.360567175794303), np.float64(0.6433927460157636), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.054293734116568765), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(4.450312892752409), np.float64(1.8915178993145003), np.float64(-5.801203960010585), np.float64(0.3111643669578199), np.float64(-0.1521609496625161), np.float64(0.20136540080403034), np.float64(0.04471061572777259), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.056167502283047954), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.25350021021662483), np.float64(-0.2462390374708025), np.float64(-0.12419142326381637), np.float64(0.15329179827876568), np.float64(0.00820105229563469), np.float64(0.007567897660545699), np.float64(-0.008298), np.float64(0.0), np.float64(0.0), np.float64(0.0)],
    [np.float64(0.03183464816350214), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.028300909672366776), np.float64(0.053541988307438566), np.float64(-0.05492374857139099), np.float64(0.0), np.float64(0.0), np.float64(-0.00010834732869724932), np.float64(0.0003825710908356584), np.float64(-0.00034046500868740456), np.float64(0.1413124436746325), np.float64(0.0), np.float64(0.0)],
    [np.float64(-0.42889630158379194), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(-4.697621415361164), np.float64(7.683421196062599), np.float64(4.06898981839711), np.float64(0.3567271874552811), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(-0.0013990241651590145), np.float64(2.9475147891527724), np.float64(-9.15095847217987), np.float64(0.0)],
])

B = np.array([
    np.float64(0.054293734116568765),
    np.float64(0.0),
    np.float64(0.0),
    np.float64(0.0),
    np.float64(0.0),
    np.float64(4.450312892752409),
    np.float64(1.8915178993145003),
    np.float64(-5.801203960010585),
    np.float64(0.3111643669578199),
    np.float64(-0.1521609496625161),
    np.float64(0.20136540080403034),
    np.float64(0.04471061572777259),
])

E3 = np.array([
    np.float64(-0.18980075407240762),
    np.float64(0.0),
    np.float64(0.0),
    np.float64(0.0),
    np.float64(0.0),
    np.float64(4.450312892752409),
    np.float64(1.8915178993145003),
    np.float64(-5.801203960010585),
    np.float64(-0.4226823213237919),
    np.float64(-0.1521609496625161),
    np.float64(0.20136540080403034),
    np.float64(0.02265179219836082),
    np.float64(0.0),
])

E5 = np.array([
    np.float64(0.01312004499419488),
    np.float64(0.0),
    np.float64(0.0),
    np.float64(0.0),
    np.float64(0.0),
    np.float64(-1.2251564463762044),
    np.float64(-0.4957589496572502),
    np.float64(1.6643771824549864),
    np.float64(-0.35032884874997366),
    np.float64(0.3341791187130175),
    np.float64(0.08192320648511571),
    np.float64(-0.022355307863886294),
    np.float64(0.0),
])

D = np.array([
    [np.float64(-8.428938276109013), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.5667149535193777), np.float64(-3.0689499459498917), np.float64(2.38466765651207), np.float64(2.117034582445028), np.float64(-0.871391583777973), np.float64(2.2404374302607883), np.float64(0.6315787787694688), np.float64(-0.08899033645133331), np.float64(18.148505520854727), np.float64(-9.194632392478356), np.float64(-4.436036387594894)],
    [np.float64(10.427508642579134), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(242.28349177525817), np.float64(165.20045171727028), np.float64(-374.5467547226902), np.float64(-22.113666853125306), np.float64(7.733432668472264), np.float64(-30.674084731089398), np.float64(-9.332130526430229), np.float64(15.697238121770845), np.float64(-31.139403219565178), np.float64(-9.35292435884448), np.float64(35.81684148639408)],
    [np.float64(19.985053242002433), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(-387.0373087493518), np.float64(-189.17813819516758), np.float64(527.8081592054236), np.float64(-11.57390253995963), np.float64(6.8812326946963), np.float64(-1.0006050966910838), np.float64(0.7777137798053443), np.float64(-2.778205752353508), np.float64(-60.19669523126412), np.float64(84.32040550667716), np.float64(11.99229113618279)],
    [np.float64(-25.69393346270375), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(0.0), np.float64(-154.18974869023643), np.float64(-231.5293791760455), np.float64(357.6391179106141), np.float64(93.40532418362432), np.float64(-37.45832313645163), np.float64(104.0996495089623), np.float64(29.8402934266605), np.float64(-43.53345659001114), np.float64(96.32455395918828), np.float64(-39.17726167561544), np.float64(-149.72683625798564)],
])
