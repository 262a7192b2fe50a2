"""Generated by scripts/gen_charmap_tables.py; do not edit."""

# (kind, j, k) -> ((num, den) for p, (num, den) for v, (num, den) for w);
# integer polynomial coefficients in the tuning factor, highest degree first.
TABLES = {
    ('P', 1, 1): (
        ([-8, 39, -48, 4],
         [8, -33, 4, 0]),
        ([12, -24, 0],
         [32, -140, 49, -4]),
        ([12, -24, 0],
         [32, -140, 49, -4]),
    ),
    ('P', 1, 2): (
        ([-1024, 4416, -2540, -6163, 528, -20],
         [4096, -17280, 3640, -225, 4, 0]),
        ([1536, 816, -13506, -1392, 0],
         [16384, -73216, 31840, -4540, 241, -4]),
        ([96, -132, -120, 0],
         [1024, -4512, 1708, -177, 4]),
    ),
    ('P', 1, 3): (
        ([-640, 3816, -6383, -712, 54, -2],
         [4096, -17280, 3640, -225, 4, 0, 0]),
        ([3840, -11028, -9600, 84],
         [16384, -73216, 31840, -4540, 241, -4]),
        ([60, -114, -12],
         [1024, -4512, 1708, -177, 4]),
    ),
    ('P', 2, 1): (
        ([-1024, 4416, -2540, -6163, 528, -20],
         [4096, -17280, 3640, -225, 4, 0]),
        ([96, -132, -120, 0],
         [1024, -4512, 1708, -177, 4]),
        ([1536, 816, -13506, -1392, 0],
         [16384, -73216, 31840, -4540, 241, -4]),
    ),
    ('P', 2, 2): (
        ([-16384, -52736, 577504, -901580, 66001, -1376, -100],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([24576, 198144, -577920, -67626, -6960, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([24576, 198144, -577920, -67626, -6960, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('P', 2, 3): (
        ([-235520, 1145216, -1330168, -234034, 27956, -1309, 1],
         [524288, -2220032, 500480, -36080, 962, -8, 0, 0]),
        ([222720, -417312, -437052, -24354, -21],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([176640, -318672, -98742, -6624, -381],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('P', 3, 1): (
        ([-640, 3816, -6383, -712, 54, -2],
         [4096, -17280, 3640, -225, 4, 0, 0]),
        ([60, -114, -12],
         [1024, -4512, 1708, -177, 4]),
        ([3840, -11028, -9600, 84],
         [16384, -73216, 31840, -4540, 241, -4]),
    ),
    ('P', 3, 2): (
        ([-235520, 1145216, -1330168, -234034, 27956, -1309, 1],
         [524288, -2220032, 500480, -36080, 962, -8, 0, 0]),
        ([176640, -318672, -98742, -6624, -381],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([222720, -417312, -437052, -24354, -21],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('P', 3, 3): (
        ([-102400, 455296, -367496, -344471, 31540, -1124, -16],
         [262144, -1110016, 250240, -18040, 481, -4, 0, 0]),
        ([153600, -180864, -366996, -34110, -1416],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([153600, -180864, -366996, -34110, -1416],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('S', 0, 0): (
        ([-147456, 602624, -203808, -231724, 21804, -865, -3],
         [1048576, -4440064, 1000960, -72160, 1924, -16, 0]),
        ([86016, -132480, -314664, -12726, -177, 0],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
        ([-61440, 376704, 6888, -8658, -321, 0],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
    ),
    ('S', 1, 0): (
        ([40960, -223744, 370016, -177892, 13646, -430, -2],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([-86016, 323328, -352464, -12054, -180, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-61440, 141696, -22848, 2808, -492, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('S', 2, 0): (
        ([655360, -3510272, 5497344, -2023200, -167736, 20175, -877, 5],
         [6291456, -26640384, 6005760, -432960, 11544, -96, 0, 0]),
        ([-458752, 1579008, -1185408, -775632, 25056, -567, 4],
         [8388608, -37617664, 16887808, -2579200, 159712, -3976, 32, 0]),
        ([-163840, 360448, -20512, -2732, -571, -47],
         [4194304, -18808832, 8443904, -1289600, 79856, -1988, 16]),
    ),
    ('S', 0, 1): (
        ([-24576, 90624, -13248, -84684, 7866, -297, -3],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([36864, -33408, -126504, -12042, -234, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-36864, 221184, 34272, -10008, -306, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('S', 1, 1): (
        ([49152, -264704, 426400, -212048, 16162, -464, -8],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([-73728, 233472, -263424, -24762, -456, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-73728, 168960, -12432, 3588, -960, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('S', 2, 1): (
        ([131072, -688128, 1034752, -380624, -43520, 5140, -229, 1],
         [1048576, -4440064, 1000960, -72160, 1924, -16, 0, 0]),
        ([-98304, 279552, -211008, -183096, 630, -21],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
        ([-98304, 211968, 14304, -2664, -708, -45],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
    ),
    ('S', 0, 2): (
        ([-16384, 49664, 43136, -118840, 10382, -331, -9],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([24576, -6144, -116088, -11262, -702, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-24576, 131328, 123312, -22716, -582, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('S', 1, 2): (
        ([32768, -188416, 337280, -190972, 12422, -160, -24],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([-49152, 173568, -209328, -25230, -1368, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-49152, 109056, 41664, 3120, -1872, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('S', 2, 2): (
        ([131072, -716800, 1145856, -422064, -111126, 11748, -509, 1],
         [1572864, -6660096, 1501440, -108240, 2886, -24, 0, 0]),
        ([-32768, 100352, -78176, -82984, -1862, -7],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-32768, 63488, 49120, -2596, -845, -43],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('S', 0, 3): (
        ([-262144, 573440, 1746432, -3112704, 155784, 2721, -713, 1],
         [6291456, -26640384, 6005760, -432960, 11544, -96, 0, 0]),
        ([65536, 38912, -415232, -47644, -3653, -43],
         [4194304, -18808832, 8443904, -1289600, 79856, -1988, 16]),
        ([-131072, 589824, 1327872, -138480, -27192, 483, -4],
         [8388608, -37617664, 16887808, -2579200, 159712, -3976, 32, 0]),
    ),
    ('S', 1, 3): (
        ([262144, -1630208, 3234816, -1993920, 57372, 6156, -619, -1],
         [3145728, -13320192, 3002880, -216480, 5772, -48, 0, 0]),
        ([-65536, 262144, -334720, -52988, -3718, -41],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
        ([-65536, 139264, 137984, 23368, -8098, 7],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
    ),
    ('S', 2, 3): (
        ([262144, -1507328, 2563584, -883872, -476304, 47094, -1909, -7],
         [4718592, -19980288, 4504320, -324720, 8658, -72, 0, 0]),
        ([-65536, 219136, -173056, -229220, -9745, -131],
         [3145728, -14106624, 6332928, -967200, 59892, -1491, 12]),
        ([-65536, 108544, 208832, 11944, -6694, -239],
         [3145728, -14106624, 6332928, -967200, 59892, -1491, 12]),
    ),
    ('T', 0, 0): (
        ([-147456, 602624, -203808, -231724, 21804, -865, -3],
         [1048576, -4440064, 1000960, -72160, 1924, -16, 0]),
        ([-61440, 376704, 6888, -8658, -321, 0],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
        ([86016, -132480, -314664, -12726, -177, 0],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
    ),
    ('T', 1, 0): (
        ([-24576, 90624, -13248, -84684, 7866, -297, -3],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([-36864, 221184, 34272, -10008, -306, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([36864, -33408, -126504, -12042, -234, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('T', 2, 0): (
        ([-16384, 49664, 43136, -118840, 10382, -331, -9],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([-24576, 131328, 123312, -22716, -582, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([24576, -6144, -116088, -11262, -702, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('T', 3, 0): (
        ([-262144, 573440, 1746432, -3112704, 155784, 2721, -713, 1],
         [6291456, -26640384, 6005760, -432960, 11544, -96, 0, 0]),
        ([-131072, 589824, 1327872, -138480, -27192, 483, -4],
         [8388608, -37617664, 16887808, -2579200, 159712, -3976, 32, 0]),
        ([65536, 38912, -415232, -47644, -3653, -43],
         [4194304, -18808832, 8443904, -1289600, 79856, -1988, 16]),
    ),
    ('T', 0, 1): (
        ([40960, -223744, 370016, -177892, 13646, -430, -2],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([-61440, 141696, -22848, 2808, -492, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-86016, 323328, -352464, -12054, -180, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('T', 1, 1): (
        ([49152, -264704, 426400, -212048, 16162, -464, -8],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([-73728, 168960, -12432, 3588, -960, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-73728, 233472, -263424, -24762, -456, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('T', 2, 1): (
        ([32768, -188416, 337280, -190972, 12422, -160, -24],
         [262144, -1110016, 250240, -18040, 481, -4, 0]),
        ([-49152, 109056, 41664, 3120, -1872, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-49152, 173568, -209328, -25230, -1368, 0],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('T', 3, 1): (
        ([262144, -1630208, 3234816, -1993920, 57372, 6156, -619, -1],
         [3145728, -13320192, 3002880, -216480, 5772, -48, 0, 0]),
        ([-65536, 139264, 137984, 23368, -8098, 7],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
        ([-65536, 262144, -334720, -52988, -3718, -41],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
    ),
    ('T', 0, 2): (
        ([655360, -3510272, 5497344, -2023200, -167736, 20175, -877, 5],
         [6291456, -26640384, 6005760, -432960, 11544, -96, 0, 0]),
        ([-163840, 360448, -20512, -2732, -571, -47],
         [4194304, -18808832, 8443904, -1289600, 79856, -1988, 16]),
        ([-458752, 1579008, -1185408, -775632, 25056, -567, 4],
         [8388608, -37617664, 16887808, -2579200, 159712, -3976, 32, 0]),
    ),
    ('T', 1, 2): (
        ([131072, -688128, 1034752, -380624, -43520, 5140, -229, 1],
         [1048576, -4440064, 1000960, -72160, 1924, -16, 0, 0]),
        ([-98304, 211968, 14304, -2664, -708, -45],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
        ([-98304, 279552, -211008, -183096, 630, -21],
         [2097152, -9404416, 4221952, -644800, 39928, -994, 8]),
    ),
    ('T', 2, 2): (
        ([131072, -716800, 1145856, -422064, -111126, 11748, -509, 1],
         [1572864, -6660096, 1501440, -108240, 2886, -24, 0, 0]),
        ([-32768, 63488, 49120, -2596, -845, -43],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
        ([-32768, 100352, -78176, -82984, -1862, -7],
         [1048576, -4702208, 2110976, -322400, 19964, -497, 4]),
    ),
    ('T', 3, 2): (
        ([262144, -1507328, 2563584, -883872, -476304, 47094, -1909, -7],
         [4718592, -19980288, 4504320, -324720, 8658, -72, 0, 0]),
        ([-65536, 108544, 208832, 11944, -6694, -239],
         [3145728, -14106624, 6332928, -967200, 59892, -1491, 12]),
        ([-65536, 219136, -173056, -229220, -9745, -131],
         [3145728, -14106624, 6332928, -967200, 59892, -1491, 12]),
    ),
}
