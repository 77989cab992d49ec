"""Printed values of the two comparison tables, used as test data."""

# name, language, type, original, debloated, size_pct, orig_det, debl_det, det_pct
TABLE1 = [
    ('Exploit.Python.PunBB.py', 'Python', 'Website attack', 4100, 1500, '63.41', 15, 0, '100'),
    ('Backdoor.Linux.Kokain.sh', 'Shell Script', 'Linux Backdoor', 4300, 2600, '39.53', 24, 1, '95.83'),
    ('Backdoor.Linux.Rootin.sh', 'Shell Script', 'Linux Backdoor', 1800, 970, '46.11', 22, 2, '90.91'),
    ('Backdoor.Python.RShell', 'Python', 'Trojan', 2400, 1400, '41.67', 6, 1, '83.33'),
    ('RedKeeper-ransomware', 'Python', 'Ransomware', 1640, 1600, '2.44', 4, 2, '50'),
    ('Trojan.Java.AppletKiller', 'Java', 'Trojan', 2800, 2100, '25.00', 40, 14, '65'),
    ('Win32.lolworm', 'C Source Code', 'Windows Worm', 10093, 7721, '23.50', 13, 2, '84.62'),
    ('I-Worm.SingLung', 'C Source Code', 'Windows Worm', 8254, 7642, '7.41', 3, 0, '100'),
    ('I-Worm.PieceByPiece', 'C Source Code', 'Windows Worm', 23415, 18305, '21.82', 12, 2, '83.33'),
    ('Apex Predator', 'Python', 'Trojan Downloader', 6299, 5346, '15.13', 20, 8, '60'),
    ('IRCBot.r.pl', 'Perl', 'Ircbot', 70783, 41022, '42.05', 3, 3, '0'),
    ('xenotix', 'Python', 'Keylogger', 5890, 3647, '38.08', 0, 0, '0'),
    ('angst', 'Python', 'Ransomware', 15050, 11204, '25.55', 0, 0, '0'),
    ('CryPy', 'Python', 'Ransomware', 10323, 5647, '45.30', 3, 3, '0'),
    ('shellbot.ah.pl', 'Perl', 'Shellbot', 16047, 13839, '13.76', 28, 27, '3.57'),
    ('Cyper.py', 'Python', 'Ransomware', 6000, 2500, '58.33', 17, 9, '47.06'),
    ('IRCBot.z.pl', 'Perl', 'Bot-net', 64000, 8000, '87.50', 32, 29, '9.38'),
    ('Dompu', 'Perl', 'Backdoor', 76587, 66481, '13.20', 37, 30, '18.92'),
]

# md5, architecture, file_size, bytes_modified, orig_det, debl_det, det_pct
TABLE2 = [
    ('005fd222a6bab3c3dfd6068bf6260a5c', 'MIPS 32-bit ELF', 146836, 356, 39, 33, '15.38'),
    ('02a9c1ddd9046c96ac1fcc98b0ea2b2a', 'x86 32-bit ELF', 90675, 190, 41, 37, '9.76'),
    ('0521470b0367e404b08a43b8bc3e6e8a', 'x86 64-bit ELF', 122029, 34, 42, 35, '16.67'),
    ('f32ee477ed0ba24e9161177b0e7863b3', 'x86 64-bit ELF', 138511, 33, 42, 38, '9.52'),
    ('35656433a9b04edeb7efc2117d59dd83', 'ARM 32-bit ELF', 119890, 256, 41, 36, '12.20'),
    ('4733f2a8a1e6c477c9a24eecbd6a5391', 'SPARC 32-bit ELF', 114543, 1276, 41, 35, '14.63'),
    ('7832c7b0a6d7543a062b855746266c1c', 'x86 32-bit ELF', 72840, 41, 41, 38, '7.32'),
    ('11aeb61c2453d7cc9e00b17b357a96fb', 'x86 32-bit ELF', 54096, 224, 40, 33, '17.50'),
    ('6040496480cc0464e8d985f60800956f', 'Motorola m68k 32-bit ELF', 143991, 49, 38, 31, '18.42'),
    ('9548009cc7cb4ae474005d4d73520773', 'ARM 32-bit ELF', 142308, 1160, 41, 36, '12.20'),
]
