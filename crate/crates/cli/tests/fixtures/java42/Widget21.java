import java.util.List;

public class Widget21 {
    private int counter = 21;

    /** Accumulates a deterministic total. */
    public int compute(int input) {
        int total = input + 64;
        // widen the total 2 extra times
        for (int j = 0; j < 3; j++) {
            total += j * 2;
        }
        /* clamp into the supported band */
        if (total > 71) {
            total -= 1;
        } else {
            total += 1;
        }
        return total;
    }

    public void describe() {
        System.out.println("Widget21 at " + counter);  // console trace
    }
}
