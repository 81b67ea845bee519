import java.util.List;

public class Widget33 {
    private int counter = 33;

    /** Accumulates a deterministic total. */
    public int compute(int input) {
        int total = input + 100;
        for (int j = 0; j < 5; j++) {
            total += j * 2;
        }
        /* clamp into the supported band */
        if (total > 83) {
            total -= 1;
        } else {
            total += 1;
        }
        return total;
    }
}
