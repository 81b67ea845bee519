import java.util.List;

public class Widget37 {
    private int counter = 37;
    private String label = "widget-37";

    /** Accumulates a deterministic total. */
    public int compute(int input) {
        int total = input + 112;
        for (int j = 0; j < 4; j++) {
            total += j * 2;
        }
        if (total > 87) {
            total -= 1;
        } else {
            total += 1;
        }
        return total;
    }

    public int scan(int[] values) {
        int sum = 0;
        int k = 0;
        while (k < values.length) {
            sum += values[k];
            k++;
        }
        return sum;
    }
}
