from splitweave.palette import MIN_DELTA_E, SCHEMES, delta_e, sample_palette


def test_same_seed_identical():
    assert sample_palette(7) == sample_palette(7)


def test_sizes_and_legibility():
    for seed in range(500):
        palette = sample_palette(seed)
        assert 3 <= len(palette.colors) <= 6
        assert palette.scheme in SCHEMES
        for i in range(len(palette.colors)):
            for j in range(i + 1, len(palette.colors)):
                assert delta_e(palette.colors[i], palette.colors[j]) >= MIN_DELTA_E


def test_monochrome_hues_agree():
    import colorsys
    found = 0
    for seed in range(200):
        palette = sample_palette(seed)
        if palette.scheme != "monochrome":
            continue
        found += 1
        hues = []
        for c in palette.colors:
            h, l, s = colorsys.rgb_to_hls(c.r / 255, c.g / 255, c.b / 255)
            if s > 1e-6:
                hues.append(h * 360.0)
        base = hues[0]
        for h in hues[1:]:
            diff = min(abs(h - base), 360 - abs(h - base))
            assert diff <= 1.0
    assert found > 10


def test_light_dark_helpers():
    palette = sample_palette(3)
    from splitweave.palette import color_to_lab
    ls = [color_to_lab(c)[0] for c in palette.colors]
    assert color_to_lab(palette.lightest())[0] == max(ls)
    assert color_to_lab(palette.darkest())[0] == min(ls)
