//! Embedded 5x7 bitmap font covering the label and annotation text.

pub const WIDTH: usize = 5;
pub const HEIGHT: usize = 7;
/// Blank columns between glyphs, before scaling.
pub const SPACING: usize = 1;

/// Rows top to bottom, bit 4 is the leftmost pixel.
pub fn glyph(ch: char) -> [u8; HEIGHT] {
    match ch {
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F],
        '3' => [0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C],
        'x' => [0x00, 0x00, 0x11, 0x0A, 0x04, 0x0A, 0x11],
        '?' => [0x0E, 0x11, 0x01, 0x02, 0x04, 0x00, 0x04],
        'I' => [0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E],
        'O' => [0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'T' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
        'e' => [0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E],
        'n' => [0x00, 0x00, 0x16, 0x19, 0x11, 0x11, 0x11],
        'p' => [0x00, 0x00, 0x1E, 0x11, 0x1E, 0x10, 0x10],
        's' => [0x00, 0x00, 0x0E, 0x10, 0x0E, 0x01, 0x1E],
        't' => [0x08, 0x08, 0x1C, 0x08, 0x08, 0x09, 0x06],
        'u' => [0x00, 0x00, 0x11, 0x11, 0x11, 0x13, 0x0D],
        _ => [0; HEIGHT],
    }
}

pub fn text_width(text: &str, scale: usize) -> usize {
    let n = text.chars().count();
    if n == 0 {
        return 0;
    }
    (n * (WIDTH + SPACING) - SPACING) * scale
}

/// Calls `plot(dx, dy)` for every lit pixel of `text` at `scale`.
pub fn draw(text: &str, scale: usize, mut plot: impl FnMut(usize, usize)) {
    for (i, ch) in text.chars().enumerate() {
        let x0 = i * (WIDTH + SPACING) * scale;
        for (row, bits) in glyph(ch).iter().enumerate() {
            for col in 0..WIDTH {
                if bits & (1 << (WIDTH - 1 - col)) == 0 {
                    continue;
                }
                for sy in 0..scale {
                    for sx in 0..scale {
                        plot(x0 + col * scale + sx, row * scale + sy);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(text_width("", 2), 0);
        assert_eq!(text_width("Input", 1), 29);
        assert_eq!(text_width("3 x 3", 2), 58);
    }

    #[test]
    fn drawn_pixels_stay_in_box() {
        let text = "Output 10 x 9?";
        let (w, h) = (text_width(text, 2), HEIGHT * 2);
        let mut lit = 0;
        draw(text, 2, |x, y| {
            assert!(x < w && y < h);
            lit += 1;
        });
        assert!(lit > 0);
    }

    #[test]
    fn every_label_character_has_a_glyph() {
        for ch in "0123456789x?IOTenpstu".chars() {
            assert!(glyph(ch).iter().any(|&row| row != 0), "{ch}");
        }
        assert!(glyph(' ').iter().all(|&row| row == 0));
    }
}
