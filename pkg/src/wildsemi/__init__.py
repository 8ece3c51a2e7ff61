"""wildsemi: exact-arithmetic toolkit for the 3x+1 semigroup.

The multiplicative semigroup S generated by 2 and the fractions
(2k+1)/(3k+2) contains every positive rational a/b in lowest terms
whose denominator is not divisible by 3; its inverse W (generated by
1/2 and g(k) = (3k+2)/(2k+1)) contains in particular every positive
integer coprime to 3, the "wild numbers".  This package replays the
mechanical parts of that argument: certificate algebra (certify),
decreasing residue-class covers and the -1 obstruction (residue),
smooth-pair constructions and the induction driver (wildprove), all
over exact rationals (core), with a CLI front end (cli).
"""

__version__ = "0.1.0"
