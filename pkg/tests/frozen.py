"""Regression values frozen at first build."""

# sqrt(l) sum^h L(1/2) lambda(l^2) + log l - log kappa, for l = 1, 2, 3, 5
TWIST_LS = (1, 2, 3, 5)
TWIST_RESIDUALS = {
    40: (-1.6350777689127702, -2.4876906543763075, -0.10087885425556786, -0.5826558484471875),
    42: (-1.7596478486403222, -0.14259731681698984, -2.1111541153075564, -2.420595557617765),
    44: (-1.8829081508520131, -1.9907767866197967, -0.9312878644445033, -5.061743441459181),
    46: (-1.9975504042463834, -3.2039551161253366, -2.220060975209296, 0.052575579055529786),
    48: (-1.4155690528196536, -0.5056615278565739, -3.497745884052806, -0.4438532768211547),
    50: (-2.214405655972809, -3.1664036450782307, -1.162859458060845, -3.1306860081774777),
    52: (-1.6527935461098706, -0.08132881501694644, -0.24798633222149613, -3.936740783899671),
    54: (-1.7619096054527645, -2.560895343281155, -2.254240469594114, 1.7199615783386095),
    56: (-1.8709061672180414, -2.4620125254772764, -2.5718349127520077, -2.116720932076994),
    58: (-1.9731762183614752, -1.6699944721060156, -2.4123754006074556, -3.8477674910544555),
    60: (-1.454802334348702, -0.9180535212171916, -0.6645094967008989, 1.6400154994816623),
}
TWIST_TOL = 1e-8
# max over kappa of (max - min) across l, the pinned spread envelope
TWIST_SPREAD_ENVELOPE = 4.2808569216197645

# coarse GRH report, kappa = 12, x = 1e3
GRH_MARGIN_K12_X1E3 = 0.7999335300835497
GRH_FLOOR = -5.0
